while (i < 3) {
        i++;
}
