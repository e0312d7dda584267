// Socket layer: connects, feeds server messages to the model, reconnects
// with the stored participant id so a dropped phone keeps its identity.

import {
  applyServer,
  canSelect,
  type ClientModel,
  initialModel,
  localSelect,
  setConnection,
} from './model'
import { parseServerMessage } from './protocol'

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null
  onclose: ((ev?: unknown) => void) | null
  onmessage: ((ev: { data: unknown }) => void) | null
  send(data: string): void
  close(): void
}

export interface ClientOptions {
  /** WebSocket constructor; injectable for headless tests. */
  socketFactory?: (url: string) => SocketLike
  /** participant-id persistence; defaults to in-memory. */
  loadParticipant?: () => string | null
  storeParticipant?: (id: string) => void
  reconnectDelayMs?: number
  onChange?: (model: ClientModel) => void
}

export class SkiniClient {
  model: ClientModel = initialModel()
  private socket: SocketLike | null = null
  private stopped = false
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null

  constructor(private baseUrl: string, private options: ClientOptions = {}) {}

  connect(): void {
    this.stopped = false
    const stored = this.options.loadParticipant?.() ?? this.model.participantId
    const url =
      this.baseUrl +
      (stored ? `?participant=${encodeURIComponent(stored)}` : '')
    const factory =
      this.options.socketFactory ??
      ((u: string) => new WebSocket(u) as unknown as SocketLike)
    const socket = factory(url)
    this.socket = socket
    socket.onopen = () => this.update(setConnection(this.model, 'live'))
    socket.onclose = () => {
      if (this.stopped) return
      this.update(setConnection(this.model, 'reconnecting'))
      this.reconnectTimer = setTimeout(
        () => this.connect(),
        this.options.reconnectDelayMs ?? 1000,
      )
    }
    socket.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data))
      if (msg === null) return
      if (msg.type === 'hello') this.options.storeParticipant?.(msg.participantId)
      this.update(applyServer(this.model, msg))
    }
  }

  close(): void {
    this.stopped = true
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer)
    this.socket?.close()
  }

  /** Tap handler: optimistic pending, guarded by the local cap mirror. */
  select(patternId: string): boolean {
    const { model, send } = localSelect(this.model, patternId)
    this.update(model)
    if (send) this.socket?.send(JSON.stringify({ type: 'select', patternId }))
    return send
  }

  ping(): void {
    if (this.model.connection === 'live') {
      this.socket?.send(JSON.stringify({ type: 'ping' }))
    }
  }

  get canSelect(): boolean {
    return canSelect(this.model)
  }

  private update(model: ClientModel): void {
    this.model = model
    this.options.onChange?.(model)
  }
}
