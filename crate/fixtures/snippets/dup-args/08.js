const o = {
  m: function (p, p) {
    return p;
  },
};
