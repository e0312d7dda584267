// DOM rendering: one function from model to screen. Buttons come only from
// the latest matrix snapshot; everything gets disabled at the pending cap.

import { type ClientModel, canSelect, pendingCount, PENDING_CAP } from './model'

export interface UiCallbacks {
  onSelect: (patternId: string) => void
}

export function render(
  root: HTMLElement, model: ClientModel, callbacks: UiCallbacks,
): void {
  root.innerHTML = ''
  root.appendChild(header(model))
  root.appendChild(groupGrid(model, callbacks))
  root.appendChild(footer(model))
  if (model.toast) {
    const toast = el('div', 'toast', model.toast)
    root.appendChild(toast)
  }
  if (model.flash) {
    root.classList.remove('flash')
    void root.offsetWidth // retrigger the css animation
    root.classList.add('flash')
    if (typeof navigator !== 'undefined' && 'vibrate' in navigator) {
      navigator.vibrate(80)
    }
  }
}

function header(model: ClientModel): HTMLElement {
  const bar = el('header', 'topbar')
  bar.appendChild(el('h1', '', 'skini'))
  const status = el('span', `status status-${model.connection}`)
  status.textContent =
    model.connection === 'live' ? 'live' :
    model.connection === 'connecting' ? 'connecting…' : 'reconnecting…'
  bar.appendChild(status)
  return bar
}

function groupGrid(model: ClientModel, callbacks: UiCallbacks): HTMLElement {
  const main = el('main', 'groups')
  if (model.groups.length === 0) {
    main.appendChild(el('p', 'empty', 'waiting for the music…'))
    return main
  }
  const enabled = canSelect(model)
  for (const group of model.groups) {
    const section = el('section', 'group')
    section.appendChild(
      el('h2', '', group.kind === 'tank' ? `${group.name} (once each)` : group.name),
    )
    const wrap = el('div', 'patterns')
    for (const patternId of group.patterns) {
      const button = el('button', 'pattern', patternId) as HTMLButtonElement
      button.dataset.pattern = patternId
      button.disabled = !enabled
      button.addEventListener('click', () => callbacks.onSelect(patternId))
      wrap.appendChild(button)
    }
    section.appendChild(wrap)
    main.appendChild(section)
  }
  return main
}

function footer(model: ClientModel): HTMLElement {
  const bar = el('footer', 'bottombar')
  const pending = el('span', 'pending')
  pending.textContent = `pending ${pendingCount(model)}/${PENDING_CAP}`
  bar.appendChild(pending)
  const chips = el('span', 'chips')
  for (const s of model.selections.slice(-PENDING_CAP)) {
    const label =
      s.status === 'queued' && s.delaySeconds !== undefined
        ? `${s.patternId} · ~${Math.max(1, Math.ceil(s.delaySeconds))} s`
        : s.status === 'played'
          ? `${s.patternId} ✓`
          : `${s.patternId} …`
    chips.appendChild(el('span', `chip chip-${s.status}`, label))
  }
  bar.appendChild(chips)
  if (model.feed) bar.appendChild(el('span', 'feed', model.feed))
  return bar
}

function el(tag: string, cls = '', text = ''): HTMLElement {
  const node = document.createElement(tag)
  if (cls) node.className = cls
  if (text) node.textContent = text
  return node
}
