import * as path from 'path';
console.log(path.sep);
