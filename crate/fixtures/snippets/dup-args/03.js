function h(a, b, c, b) {}
