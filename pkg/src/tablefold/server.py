"""HTTP + WebSocket service hosting named sessions.

Endpoints:
  POST /session                      multipart CSV (+ optional descriptor JSON)
  GET  /session/{id}/state           snapshot document
  POST /session/{id}/export.csv      CSV of the visible rows
  GET  /session/{id}/scene?first=&last=
  WS   /session/{id}/ws              Command JSON in, Delta JSON out;
                                     heartbeat every 15 s

Commands within one session run under a per-session lock (serialized
mutations); sessions are independent.
"""

from __future__ import annotations

import asyncio
import json
from typing import Optional

from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.responses import JSONResponse, Response
from starlette.websockets import WebSocket, WebSocketDisconnect

from . import data as da
from .errors import TableFoldError
from .schemas import validate_descriptor
from .session import PROTOCOL_VERSION, Session

HEARTBEAT_SECONDS = 15.0


class SessionStore:
    def __init__(self):
        self.sessions: dict[str, Session] = {}
        self.locks: dict[str, asyncio.Lock] = {}

    def add(self, session: Session):
        self.sessions[session.id] = session
        self.locks[session.id] = asyncio.Lock()

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return session

    def lock(self, session_id: str) -> asyncio.Lock:
        return self.locks[session_id]


def create_app(store: Optional[SessionStore] = None) -> FastAPI:
    app = FastAPI(title="tablefold", version="0.1.0")
    app.state.store = store or SessionStore()

    @app.post("/session")
    async def create_session(csv: UploadFile = File(...),
                             descriptor: Optional[UploadFile] = File(None),
                             descriptor_json: Optional[str] = Form(None)):
        raw = await csv.read()
        desc = None
        if descriptor is not None:
            desc = json.loads(await descriptor.read())
        elif descriptor_json:
            desc = json.loads(descriptor_json)
        try:
            if desc is not None:
                validate_descriptor(desc)
            dataset = da.load_dataset(raw, desc)
        except TableFoldError as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        session = Session(dataset)
        app.state.store.add(session)
        return {"protocol_version": PROTOCOL_VERSION, "session": session.id,
                "version": session.state.version,
                "row_count": dataset.row_count,
                "columns": [c.to_dict() for c in dataset.columns]}

    @app.get("/session/{session_id}/state")
    async def get_state(session_id: str):
        session = app.state.store.get(session_id)
        return session.snapshot()

    @app.post("/session/{session_id}/export.csv")
    async def export_csv(session_id: str):
        session = app.state.store.get(session_id)
        return Response(content=session.export_csv(), media_type="text/csv")

    @app.get("/session/{session_id}/scene")
    async def get_scene(session_id: str, first: int = 0, last: int = 0):
        session = app.state.store.get(session_id)
        return session.scene_doc(first, last)

    @app.post("/session/{session_id}/command")
    async def post_command(session_id: str, command: dict):
        session = app.state.store.get(session_id)
        async with app.state.store.lock(session_id):
            try:
                return JSONResponse(session.apply_command(command))
            except TableFoldError as e:
                raise HTTPException(status_code=400, detail=str(e)) from None

    @app.websocket("/session/{session_id}/ws")
    async def session_ws(websocket: WebSocket, session_id: str):
        await websocket.accept()
        store: SessionStore = app.state.store
        if session_id not in store.sessions:
            await websocket.send_json({"protocol_version": PROTOCOL_VERSION,
                                       "error": f"no session {session_id}"})
            await websocket.close()
            return
        session = store.sessions[session_id]

        async def heartbeat():
            while True:
                await asyncio.sleep(HEARTBEAT_SECONDS)
                await websocket.send_json({"protocol_version": PROTOCOL_VERSION,
                                           "kind": "heartbeat"})

        beat = asyncio.create_task(heartbeat())
        try:
            while True:
                command = await websocket.receive_json()
                async with store.lock(session_id):
                    try:
                        reply = session.apply_command(command)
                    except TableFoldError as e:
                        reply = {"protocol_version": PROTOCOL_VERSION,
                                 "rejected": True,
                                 "current_version": session.state.version,
                                 "error": str(e)}
                await websocket.send_json(reply)
        except WebSocketDisconnect:
            pass
        finally:
            beat.cancel()

    return app


def run(host: str = "127.0.0.1", port: int = 8000):
    import uvicorn
    uvicorn.run(create_app(), host=host, port=port, log_level="warning")
