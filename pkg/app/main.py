from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from dotenv import load_dotenv

from .api.plan_router import router as plan_router
from .api.solve_router import router as solve_router

load_dotenv()
app = FastAPI(title="Coarse-grid redistribution planner")

# CORS 설정
app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# 라우터에 이미 prefix가 설정되어 있으므로 추가 prefix 없이 등록
app.include_router(plan_router)
app.include_router(solve_router)


@app.get("/")
def read_root():
    return {"service": "redist", "status": "ok"}
