/** Dwell measurement: visibility time of the opened document view. */

export type Clock = () => number;

export class DwellTimer {
  private startedAt: number | null = null;

  constructor(private readonly clock: Clock = () => Date.now()) {}

  start(): void {
    this.startedAt = this.clock();
  }

  /** Stop and return elapsed seconds; 0 when never started. */
  stop(): number {
    if (this.startedAt === null) return 0;
    const seconds = (this.clock() - this.startedAt) / 1000;
    this.startedAt = null;
    return Math.max(0, seconds);
  }

  get running(): boolean {
    return this.startedAt !== null;
  }
}
