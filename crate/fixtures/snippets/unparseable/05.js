console.log('unterminated);
