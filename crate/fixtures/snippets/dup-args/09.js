function mixed(a, a) {
  if (a == 1) {
    return a
  }
}
