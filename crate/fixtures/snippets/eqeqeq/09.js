do {
  k++;
} while (k != 10);
