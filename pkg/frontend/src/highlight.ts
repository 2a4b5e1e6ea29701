// Minimal Arduino/C++ highlighter for the sketch preview pane. One regex
// pass, everything HTML-escaped before any markup is added.

const KEYWORDS = new Set([
  'void', 'int', 'long', 'float', 'double', 'char', 'bool', 'boolean', 'byte',
  'unsigned', 'short', 'const', 'static', 'volatile', 'struct', 'class',
  'return', 'if', 'else', 'for', 'while', 'do', 'switch', 'case', 'default',
  'break', 'continue', 'true', 'false', 'String', 'uint8_t', 'uint16_t',
  'uint32_t', 'int8_t', 'int16_t', 'int32_t', 'size_t', 'auto', 'new', 'delete',
]);

const BUILTINS = new Set([
  'setup', 'loop', 'pinMode', 'digitalWrite', 'digitalRead', 'analogWrite',
  'analogRead', 'delay', 'delayMicroseconds', 'millis', 'micros', 'Serial',
  'Wire', 'SPI', 'map', 'constrain', 'random', 'randomSeed', 'attachInterrupt',
  'HIGH', 'LOW', 'INPUT', 'OUTPUT', 'INPUT_PULLUP', 'LED_BUILTIN',
]);

function escapeHtml(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

const TOKEN = new RegExp(
  [
    '(\\/\\/[^\\n]*)',                  // line comment
    '(\\/\\*[\\s\\S]*?(?:\\*\\/|$))',   // block comment
    '("(?:[^"\\\\\\n]|\\\\.)*"?)',      // string literal
    "('(?:[^'\\\\\\n]|\\\\.)*'?)",      // char literal
    '(^\\s*#\\s*\\w+[^\\n]*)',          // preprocessor line
    '(\\b\\d[\\w.]*\\b)',               // number
    '(\\b[A-Za-z_]\\w*\\b)',            // identifier
  ].join('|'),
  'gm'
);

export function highlight(source: string): string {
  let out = '';
  let last = 0;
  for (const m of source.matchAll(TOKEN)) {
    const idx = m.index ?? 0;
    out += escapeHtml(source.slice(last, idx));
    const text = escapeHtml(m[0]);
    if (m[1] !== undefined || m[2] !== undefined) {
      out += `<span class="hl-comment">${text}</span>`;
    } else if (m[3] !== undefined || m[4] !== undefined) {
      out += `<span class="hl-string">${text}</span>`;
    } else if (m[5] !== undefined) {
      out += `<span class="hl-pre">${text}</span>`;
    } else if (m[6] !== undefined) {
      out += `<span class="hl-num">${text}</span>`;
    } else if (KEYWORDS.has(m[0])) {
      out += `<span class="hl-kw">${text}</span>`;
    } else if (BUILTINS.has(m[0])) {
      out += `<span class="hl-builtin">${text}</span>`;
    } else {
      out += text;
    }
    last = idx + m[0].length;
  }
  out += escapeHtml(source.slice(last));
  return out;
}
