export default { key: 'value' };
