if (value === undefined) {
  value = 0;
}
