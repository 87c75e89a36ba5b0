const g = function (x, y, x) {
  return x;
};
