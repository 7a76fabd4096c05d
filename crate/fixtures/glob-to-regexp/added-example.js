var globToRegExp = require('glob-to-regexp');
var re = globToRegExp("*/www/{*.js,*.html}", { flags: "i", globstar: true });
re.test("http://example.com/www/app.js"); // true
