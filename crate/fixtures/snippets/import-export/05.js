import 'polyfill';
