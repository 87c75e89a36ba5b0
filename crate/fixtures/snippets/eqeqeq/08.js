function eq(a, b) {
  return a == b;
}
