// Client-side state: a pure reducer over server messages and user taps.
// The socket layer feeds messages in; the UI renders the resulting model.

import type { GroupView, ServerMessage } from './protocol'

export const PENDING_CAP = 3

export type Connection = 'connecting' | 'live' | 'reconnecting'

export interface Selection {
  patternId: string
  status: 'inflight' | 'queued' | 'played'
  delaySeconds?: number
}

export interface ClientModel {
  participantId: string | null
  revision: number
  groups: GroupView[]
  acked: number      // pending count the server last confirmed
  inflight: number   // sent, no ack or reject yet
  selections: Selection[]
  connection: Connection
  toast: string | null
  feed: string | null
  flash: boolean     // one played notification arrived; UI clears it
}

export function initialModel(): ClientModel {
  return {
    participantId: null,
    revision: -1,
    groups: [],
    acked: 0,
    inflight: 0,
    selections: [],
    connection: 'connecting',
    toast: null,
    feed: null,
    flash: false,
  }
}

export function pendingCount(model: ClientModel): number {
  return model.acked + model.inflight
}

/** The client-side mirror of the server's admission cap. */
export function canSelect(model: ClientModel): boolean {
  return model.connection === 'live' && pendingCount(model) < PENDING_CAP
}

export function setConnection(
  model: ClientModel, connection: Connection,
): ClientModel {
  // in-flight sends are lost with the socket
  return { ...model, connection, inflight: 0 }
}

/** A user tap. Returns the new model and whether to actually send. */
export function localSelect(
  model: ClientModel, patternId: string,
): { model: ClientModel; send: boolean } {
  if (!canSelect(model)) {
    return {
      model: { ...model, toast: 'three selections already queued' },
      send: false,
    }
  }
  return {
    model: {
      ...model,
      inflight: model.inflight + 1,
      selections: [...model.selections, { patternId, status: 'inflight' }],
      toast: null,
    },
    send: true,
  }
}

export function applyServer(
  model: ClientModel, msg: ServerMessage,
): ClientModel {
  switch (msg.type) {
    case 'hello':
      return { ...model, participantId: msg.participantId }
    case 'matrix':
      return { ...model, revision: msg.revision, groups: msg.groups }
    case 'ack': {
      const selections = resolveFirst(model.selections, msg.patternId, {
        patternId: msg.patternId,
        status: 'queued',
        delaySeconds: msg.delaySeconds,
      })
      return {
        ...model,
        inflight: Math.max(0, model.inflight - 1),
        acked: msg.pending,
        selections,
        toast: `plays in ~${Math.max(1, Math.ceil(msg.delaySeconds))} s`,
      }
    }
    case 'reject': {
      const selections = model.selections.filter(
        (s) => !(s.status === 'inflight' && s.patternId === msg.patternId),
      )
      return {
        ...model,
        inflight: Math.max(0, model.inflight - 1),
        acked: msg.pending,
        selections,
        toast: msg.reason,
      }
    }
    case 'played': {
      const selections = resolveFirst(model.selections, msg.patternId, {
        patternId: msg.patternId,
        status: 'played',
      }, 'queued')
      return {
        ...model,
        acked: Math.max(0, model.acked - 1),
        selections,
        flash: true,
      }
    }
    case 'feed':
      return { ...model, feed: msg.text }
    case 'error':
      return { ...model, toast: msg.message }
    case 'pong':
      return model
  }
}

export function clearFlash(model: ClientModel): ClientModel {
  return model.flash ? { ...model, flash: false } : model
}

function resolveFirst(
  selections: Selection[],
  patternId: string,
  replacement: Selection,
  fromStatus: Selection['status'] = 'inflight',
): Selection[] {
  const index = selections.findIndex(
    (s) => s.status === fromStatus && s.patternId === patternId,
  )
  if (index < 0) return selections
  const next = selections.slice()
  next[index] = replacement
  return next
}
