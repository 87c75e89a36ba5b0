exports.isEven = (n) => n % 2 === 0;
exports.isOdd = (n) => n % 2 !== 0;
