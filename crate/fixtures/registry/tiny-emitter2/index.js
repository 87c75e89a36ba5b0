module.exports = class { constructor() { this.h = {}; } on(n, f) { (this.h[n] = this.h[n] || []).push(f); } emit(n, ...a) { (this.h[n] || []).forEach((f) => f(...a)); } };
