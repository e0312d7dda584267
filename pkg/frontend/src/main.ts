import { SkiniClient } from './client'
import { clearFlash } from './model'
import { render } from './ui'

const root = document.getElementById('app')!
const wsUrl =
  (location.protocol === 'https:' ? 'wss://' : 'ws://') + location.host + '/ws'

const client = new SkiniClient(wsUrl, {
  loadParticipant: () => localStorage.getItem('skini-participant'),
  storeParticipant: (id) => localStorage.setItem('skini-participant', id),
  onChange: (model) => {
    render(root, model, { onSelect: (patternId) => client.select(patternId) })
    if (model.flash) setTimeout(() => {
      client.model = clearFlash(client.model)
    }, 600)
  },
})

client.connect()
setInterval(() => client.ping(), 5000)

fetch('/meta')
  .then((r) => r.json())
  .then((meta: { title?: string }) => {
    if (meta.title) document.title = `${meta.title} — skini`
  })
  .catch(() => undefined)
