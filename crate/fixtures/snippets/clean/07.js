for (const k of Object.keys(o)) {
  console.log(k);
}
