const merge = (a, b) => { const out = { ...a }; for (const k of Object.keys(b)) out[k] = (typeof b[k] === 'object' && typeof a[k] === 'object') ? merge(a[k], b[k]) : b[k]; return out; };
module.exports = merge;
