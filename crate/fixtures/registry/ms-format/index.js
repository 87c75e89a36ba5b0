module.exports = (n) => (n >= 60000 ? Math.round(n / 60000) + 'm' : Math.round(n / 1000) + 's');
