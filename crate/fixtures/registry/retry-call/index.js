module.exports = require('retry-call-native-binding-does-not-exist');
