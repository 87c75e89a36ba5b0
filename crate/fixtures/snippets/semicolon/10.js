do {
  i++
} while (i < 3)
