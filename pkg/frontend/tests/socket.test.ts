import { describe, expect, it, vi } from "vitest";

import { CommandSender, reconnectDelayMs } from "../src/socket.js";
import { Command } from "../src/protocol.js";

function makeSender() {
  const sent: string[] = [];
  const reverts: Array<{ command: Command; message: string }> = [];
  const sender = new CommandSender(
    { send: (text) => sent.push(text) },
    (command, message) => reverts.push({ command, message }),
  );
  return { sender, sent, reverts };
}

describe("CommandSender debouncing", () => {
  it("coalesces rapid updates of the same command type", () => {
    vi.useFakeTimers();
    const { sender, sent } = makeSender();
    sender.send({ type: "set_speed", value: -0.5 });
    sender.send({ type: "set_speed", value: -1.0 });
    sender.send({ type: "set_speed", value: -1.5 });
    vi.advanceTimersByTime(60);
    expect(sent).toHaveLength(1);
    expect(JSON.parse(sent[0])).toEqual({ type: "set_speed", value: -1.5 });
    vi.useRealTimers();
  });

  it("keeps distinct command types independent", () => {
    vi.useFakeTimers();
    const { sender, sent } = makeSender();
    sender.send({ type: "set_speed", value: -0.5 });
    sender.send({ type: "set_pendulum", value: 10 });
    vi.advanceTimersByTime(60);
    expect(sent).toHaveLength(2);
    vi.useRealTimers();
  });

  it("waits the debounce window before sending", () => {
    vi.useFakeTimers();
    const { sender, sent } = makeSender();
    sender.send({ type: "pause" });
    vi.advanceTimersByTime(30);
    expect(sent).toHaveLength(0);
    vi.advanceTimersByTime(30);
    expect(sent).toHaveLength(1);
    vi.useRealTimers();
  });
});

describe("CommandSender bounds and reverts", () => {
  it("never puts an out-of-bounds command on the wire", () => {
    vi.useFakeTimers();
    const { sender, sent, reverts } = makeSender();
    let reverted = false;
    sender.send({ type: "set_speed", value: 99 }, () => {
      reverted = true;
    });
    vi.advanceTimersByTime(100);
    expect(sent).toHaveLength(0);
    expect(reverted).toBe(true);
    expect(reverts).toHaveLength(1);
    vi.useRealTimers();
  });

  it("reverts the optimistic update when the server rejects", () => {
    vi.useFakeTimers();
    const { sender, sent, reverts } = makeSender();
    let value = 10;
    sender.send({ type: "set_pendulum", value: 20 }, () => {
      value = 10;
    });
    value = 20; // optimistic update
    vi.advanceTimersByTime(60);
    expect(sent).toHaveLength(1);
    sender.handleError("bounds");
    expect(value).toBe(10);
    expect(reverts[0].message).toBe("bounds");
    expect(sender.pendingCount).toBe(0);
    vi.useRealTimers();
  });

  it("acks clear the matching in-flight command", () => {
    vi.useFakeTimers();
    const { sender } = makeSender();
    sender.send({ type: "set_speed", value: -1 });
    vi.advanceTimersByTime(60);
    expect(sender.pendingCount).toBe(1);
    sender.handleAck("set_speed");
    expect(sender.pendingCount).toBe(0);
    vi.useRealTimers();
  });
});

describe("reconnect backoff", () => {
  it("doubles from half a second and saturates at ten", () => {
    expect(reconnectDelayMs(1)).toBe(500);
    expect(reconnectDelayMs(2)).toBe(1000);
    expect(reconnectDelayMs(3)).toBe(2000);
    expect(reconnectDelayMs(10)).toBe(10000);
  });
});
