function x(n, m, n) {
  return n * m;
}
x(1, 2, 3);
