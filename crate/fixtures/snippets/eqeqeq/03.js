while (n != 0) {
  n--;
}
