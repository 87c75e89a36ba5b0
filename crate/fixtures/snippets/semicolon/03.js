var csv = require('csv')
