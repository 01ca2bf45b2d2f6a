// Encoder backends: a dual-encoder vision-language model loaded through
// transformers.js, behind an interface the exporter (and tests) can swap.
//
// Embeddings are returned raw, exactly as the projection heads emit them;
// the consuming side normalizes when it needs cosine similarity.

export interface TextEncoder {
  readonly dim: number;
  encodeText(texts: string[]): Promise<Float32Array[]>;
}

export interface ImageEncoder {
  readonly dim: number;
  encodeImage(path: string): Promise<Float32Array>;
}

export const DEFAULT_MODEL = "Xenova/clip-vit-base-patch16";

export async function loadTextEncoder(modelId: string): Promise<TextEncoder> {
  const { AutoTokenizer, CLIPTextModelWithProjection } = await import(
    "@xenova/transformers"
  );
  const tokenizer = await AutoTokenizer.from_pretrained(modelId);
  const model = await CLIPTextModelWithProjection.from_pretrained(modelId, {
    quantized: true,
  });
  let dim = 0;
  return {
    get dim() {
      return dim;
    },
    async encodeText(texts: string[]): Promise<Float32Array[]> {
      const inputs = tokenizer(texts, { padding: true, truncation: true });
      const { text_embeds } = await model(inputs);
      const [n, d] = text_embeds.dims as [number, number];
      dim = d;
      const data = text_embeds.data as Float32Array;
      const out: Float32Array[] = [];
      for (let i = 0; i < n; i++) {
        out.push(Float32Array.from(data.subarray(i * d, (i + 1) * d)));
      }
      return out;
    },
  };
}

export async function loadImageEncoder(modelId: string): Promise<ImageEncoder> {
  const { AutoProcessor, CLIPVisionModelWithProjection, RawImage } =
    await import("@xenova/transformers");
  const processor = await AutoProcessor.from_pretrained(modelId);
  const model = await CLIPVisionModelWithProjection.from_pretrained(modelId, {
    quantized: true,
  });
  let dim = 0;
  return {
    get dim() {
      return dim;
    },
    async encodeImage(path: string): Promise<Float32Array> {
      const image = await RawImage.read(path);
      const inputs = await processor(image);
      const { image_embeds } = await model(inputs);
      dim = image_embeds.dims[1] as number;
      return Float32Array.from(image_embeds.data as Float32Array);
    },
  };
}
