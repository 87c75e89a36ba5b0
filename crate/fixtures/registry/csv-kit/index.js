'use strict';

function stringify(rows) {
  return rows.map((row) => row.join(',')).join('\n');
}

function parse(text) {
  return text.trim().split(/\r?\n/).map((line) => line.split(','));
}

module.exports = { stringify, parse };
