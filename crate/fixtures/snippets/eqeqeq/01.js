if (a == b) {
  run();
}
