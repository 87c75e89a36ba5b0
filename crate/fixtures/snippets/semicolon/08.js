function g() {
  return 2
}
