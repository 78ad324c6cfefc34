/** Byte-offset handling: the service reports byte offsets into the UTF-8
 * source, while JS strings index UTF-16 code units. */

/** Map from UTF-8 byte offset to JS string index. Entry exists for every
 * valid boundary; lookups of non-boundary offsets throw. */
export function buildByteToCharMap(text: string): Map<number, number> {
  const map = new Map<number, number>();
  const encoder = new TextEncoder();
  let byte = 0;
  let index = 0;
  map.set(0, 0);
  for (const ch of text) {
    byte += encoder.encode(ch).length;
    index += ch.length; // surrogate pairs advance by 2
    map.set(byte, index);
  }
  return map;
}

export function byteToChar(map: Map<number, number>, byteOffset: number): number {
  const index = map.get(byteOffset);
  if (index === undefined) {
    throw new Error(`byte offset ${byteOffset} is not on a character boundary`);
  }
  return index;
}

/** Slice a string by UTF-8 byte offsets. */
export function sliceBytes(text: string, map: Map<number, number>,
                           start: number, end: number): string {
  return text.slice(byteToChar(map, start), byteToChar(map, end));
}
