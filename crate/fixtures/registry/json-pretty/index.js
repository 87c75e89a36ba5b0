module.exports = (v) => JSON.stringify(v, null, 2);
