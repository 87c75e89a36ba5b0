exports.load = () => ({});
