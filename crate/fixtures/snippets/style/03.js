if (x) {
      y();
}
