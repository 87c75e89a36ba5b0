import { readFile, writeFile } from 'fs';
