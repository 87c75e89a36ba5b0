module.exports = require('http-get-lite-native-binding-does-not-exist');
