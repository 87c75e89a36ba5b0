const re = /ab+c/g;
const s = `x ${re.source} y`;
