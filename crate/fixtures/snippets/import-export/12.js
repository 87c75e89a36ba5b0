export { x } from 'y';
