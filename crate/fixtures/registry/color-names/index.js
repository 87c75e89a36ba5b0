module.exports = { red: '#ff0000', green: '#008000', blue: '#0000ff' };
