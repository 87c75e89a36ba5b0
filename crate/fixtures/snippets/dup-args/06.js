function ok(a, b) {
  return a + b;
}
function bad(c, c) {
  return c;
}
