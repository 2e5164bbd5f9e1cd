"""应用包入口。"""
