module.exports = require('markdown-mini-native-binding-does-not-exist');
