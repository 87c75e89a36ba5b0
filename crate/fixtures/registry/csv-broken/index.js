module.exports = require('csv-broken-native-binding-does-not-exist');
