// Wire protocol of the performance server: JSON text frames with a `type`
// field. This file is the single source of truth for message shapes.

export interface GroupView {
  name: string
  kind: 'repeat' | 'tank'
  patterns: string[]
}

export interface HelloMsg { type: 'hello'; participantId: string }
export interface MatrixMsg { type: 'matrix'; revision: number; groups: GroupView[] }
export interface AckMsg {
  type: 'ack'
  patternId: string
  delaySeconds: number
  position: number
  pending: number
}
export interface RejectMsg {
  type: 'reject'
  patternId: string
  reason: string
  pending: number
}
export interface PlayedMsg { type: 'played'; patternId: string; participantId: string }
export interface FeedMsg { type: 'feed'; text: string }
export interface PongMsg { type: 'pong' }
export interface ErrorMsg { type: 'error'; message: string }

export type ServerMessage =
  | HelloMsg | MatrixMsg | AckMsg | RejectMsg
  | PlayedMsg | FeedMsg | PongMsg | ErrorMsg

export interface SelectMsg { type: 'select'; patternId: string }
export interface PingMsg { type: 'ping' }
export type ClientMessage = SelectMsg | PingMsg

const SERVER_TYPES = new Set([
  'hello', 'matrix', 'ack', 'reject', 'played', 'feed', 'pong', 'error',
])

/** Parse one incoming frame; null when it is not a known server message. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown
  try {
    data = JSON.parse(raw)
  } catch {
    return null
  }
  if (typeof data !== 'object' || data === null) return null
  const type = (data as { type?: unknown }).type
  if (typeof type !== 'string' || !SERVER_TYPES.has(type)) return null
  return data as ServerMessage
}
