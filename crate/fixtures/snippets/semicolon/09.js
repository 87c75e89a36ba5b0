const s = `t`
console.log(s)
