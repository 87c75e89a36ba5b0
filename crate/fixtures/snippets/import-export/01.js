import fs from 'fs';
fs.readFileSync('a');
