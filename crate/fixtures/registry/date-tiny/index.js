module.exports = require('date-tiny-native-binding-does-not-exist');
