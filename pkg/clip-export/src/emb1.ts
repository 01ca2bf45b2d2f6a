// EMB1 binary embedding container.
//
// Layout (integers little-endian):
//   magic "EMB1" | u32 version=1 | u32 dim | u32 count
//   count x [u32 name_len | UTF-8 name bytes]
//   count*dim float32 values, row-major, rows in record order

export interface Record_ {
  name: string;
  vector: Float32Array;
}

const MAGIC = "EMB1";
const VERSION = 1;

export function encodeEmb1(records: Record_[]): Buffer {
  if (records.length === 0) {
    throw new Error("EMB1 file needs at least one record");
  }
  const dim = records[0].vector.length;
  const seen = new Set<string>();
  for (const r of records) {
    if (r.vector.length !== dim) {
      throw new Error(
        `record ${r.name} has dim ${r.vector.length}, expected ${dim}`,
      );
    }
    if (seen.has(r.name)) {
      throw new Error(`duplicate record name ${r.name}`);
    }
    seen.add(r.name);
  }

  const names = records.map((r) => Buffer.from(r.name, "utf-8"));
  const headerSize = 4 + 4 + 4 + 4;
  const namesSize = names.reduce((s, n) => s + 4 + n.length, 0);
  const payloadSize = records.length * dim * 4;
  const buf = Buffer.alloc(headerSize + namesSize + payloadSize);

  let pos = 0;
  buf.write(MAGIC, pos, "ascii");
  pos += 4;
  pos = buf.writeUInt32LE(VERSION, pos);
  pos = buf.writeUInt32LE(dim, pos);
  pos = buf.writeUInt32LE(records.length, pos);
  for (const name of names) {
    pos = buf.writeUInt32LE(name.length, pos);
    pos += name.copy(buf, pos);
  }
  for (const r of records) {
    for (const value of r.vector) {
      pos = buf.writeFloatLE(value, pos);
    }
  }
  return buf;
}

export function decodeEmb1(buf: Buffer): { dim: number; records: Record_[] } {
  let pos = 0;
  const take = (n: number, what: string) => {
    if (pos + n > buf.length) {
      throw new Error(`truncated EMB1 file while reading ${what}`);
    }
    const slice = buf.subarray(pos, pos + n);
    pos += n;
    return slice;
  };

  if (take(4, "magic").toString("ascii") !== MAGIC) {
    throw new Error("not an EMB1 file (bad magic)");
  }
  const version = take(4, "version").readUInt32LE(0);
  if (version !== VERSION) {
    throw new Error(`unsupported EMB1 version ${version}`);
  }
  const dim = take(4, "dim").readUInt32LE(0);
  const count = take(4, "count").readUInt32LE(0);
  const names: string[] = [];
  for (let i = 0; i < count; i++) {
    const len = take(4, `name length ${i}`).readUInt32LE(0);
    names.push(take(len, `name ${i}`).toString("utf-8"));
  }
  const records: Record_[] = [];
  for (let i = 0; i < count; i++) {
    const vector = new Float32Array(dim);
    for (let j = 0; j < dim; j++) {
      vector[j] = take(4, `value ${i},${j}`).readFloatLE(0);
    }
    records.push({ name: names[i], vector });
  }
  if (pos !== buf.length) {
    throw new Error(`${buf.length - pos} trailing bytes after EMB1 payload`);
  }
  return { dim, records };
}
