exports.parse = (s) => Object.fromEntries(new URLSearchParams(s));
exports.stringify = (o) => new URLSearchParams(o).toString();
