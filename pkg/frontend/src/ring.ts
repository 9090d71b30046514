/** Fixed-capacity ring buffer for plot history; never grows past capacity. */
export class RingBuffer<T> {
  private readonly items: T[] = [];
  private start = 0;

  constructor(readonly capacity: number) {
    if (!Number.isInteger(capacity) || capacity <= 0) {
      throw new Error(`ring capacity must be a positive integer, got ${capacity}`);
    }
  }

  get length(): number {
    return this.items.length;
  }

  push(item: T): void {
    if (this.items.length < this.capacity) {
      this.items.push(item);
    } else {
      this.items[this.start] = item;
      this.start = (this.start + 1) % this.capacity;
    }
  }

  /** Oldest-first snapshot. */
  toArray(): T[] {
    return this.items
      .slice(this.start)
      .concat(this.items.slice(0, this.start));
  }

  last(): T | undefined {
    if (this.items.length === 0) return undefined;
    const i = (this.start + this.items.length - 1) % this.items.length;
    return this.items[i];
  }

  clear(): void {
    this.items.length = 0;
    this.start = 0;
  }
}
