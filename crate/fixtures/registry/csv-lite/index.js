exports.line = (text) => text.split(',');
