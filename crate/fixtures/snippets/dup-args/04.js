function outer() {
  function inner(q, q) {
    return q;
  }
  return inner;
}
