export * from 'other';
