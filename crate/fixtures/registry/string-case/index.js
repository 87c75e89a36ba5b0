exports.camel = (s) => s.replace(/[-_](\w)/g, (_, c) => c.toUpperCase());
exports.snake = (s) => s.replace(/[A-Z]/g, (c) => '_' + c.toLowerCase());
