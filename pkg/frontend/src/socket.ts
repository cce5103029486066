// Command channel: debounced sending with optimistic widget updates that
// snap back when the server rejects a value, plus reconnect backoff.

import { Command, validateCommand, CommandBoundsError } from "./protocol.js";

export interface CommandSink {
  send(text: string): void;
}

type RevertHandler = (command: Command, message: string) => void;

interface Pending {
  command: Command;
  revert: () => void;
}

/**
 * Debounces rapid widget changes (one command per key within the window)
 * and remembers the revert action for each in-flight command so an error
 * reply can undo the optimistic UI update.
 */
export class CommandSender {
  private timers = new Map<string, ReturnType<typeof setTimeout>>();
  private inFlight: Pending[] = [];

  constructor(
    private readonly sink: CommandSink,
    private readonly onRevert: RevertHandler,
    readonly debounceMs: number = 50,
    private readonly schedule: typeof setTimeout = setTimeout,
    private readonly cancel: typeof clearTimeout = clearTimeout,
  ) {}

  /** Queue a command; `revert` undoes the optimistic widget change. */
  send(command: Command, revert: () => void = () => {}): void {
    try {
      validateCommand(command);
    } catch (error) {
      if (error instanceof CommandBoundsError) {
        // never put an out-of-bounds message on the wire
        revert();
        this.onRevert(command, error.message);
        return;
      }
      throw error;
    }
    const key = command.type;
    const existing = this.timers.get(key);
    if (existing !== undefined) {
      this.cancel(existing);
    }
    this.timers.set(
      key,
      this.schedule(() => {
        this.timers.delete(key);
        this.inFlight.push({ command, revert });
        this.sink.send(JSON.stringify(command));
      }, this.debounceMs),
    );
  }

  /** Server acknowledged the oldest in-flight command. */
  handleAck(commandType: string): void {
    const index = this.inFlight.findIndex((p) => p.command.type === commandType);
    if (index >= 0) {
      this.inFlight.splice(index, 1);
    }
  }

  /** Server rejected a command: undo its optimistic update. */
  handleError(message: string): void {
    const pending = this.inFlight.shift();
    if (pending !== undefined) {
      pending.revert();
      this.onRevert(pending.command, message);
    }
  }

  get pendingCount(): number {
    return this.inFlight.length;
  }
}

/** Exponential backoff schedule for reconnect attempts, capped at 10 s. */
export function reconnectDelayMs(attempt: number): number {
  return Math.min(500 * 2 ** Math.max(attempt - 1, 0), 10000);
}
